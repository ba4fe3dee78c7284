import pytest

VERDICTS: list[str] = []


@pytest.fixture(autouse=True)
def _isolate_log(tmp_path, monkeypatch):
    # keep CLI runs from appending to a results log in the working tree
    monkeypatch.setenv("PRIMESUMS_LOG", str(tmp_path / "results.jsonl"))


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(VERDICTS):
            terminalreporter.write_line(line)
