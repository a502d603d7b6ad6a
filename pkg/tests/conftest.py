import pytest

# criterion number -> (passed, description); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record_criterion():
    def record(number: int, passed: bool, text: str) -> None:
        ACCEPTANCE[number] = (passed, text)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'} - {text}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {text}")
