import pytest

_RESULTS = {}
_REPORTS = []


class Recorder:
    def record(self, criterion, passed, detail=""):
        _RESULTS[criterion] = (bool(passed), detail)

    def report(self, text):
        _REPORTS.append(text)


@pytest.fixture
def acceptance():
    return Recorder()


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS and not _REPORTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for key in sorted(_RESULTS):
        passed, detail = _RESULTS[key]
        tr.write_line(f"criterion {key:>2}: {'PASS' if passed else 'FAIL'}  {detail}")
    for text in _REPORTS:
        tr.write_line("")
        for line in text.rstrip("\n").splitlines():
            tr.write_line(line)
