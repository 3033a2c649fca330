from __future__ import annotations

import pytest

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    # a setup error counts as a failure; otherwise record the call phase
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        detail = dict(rep.user_properties).get("detail", "")
        _ACCEPTANCE.append((marker.args[0], rep.passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        line = f"{'PASS' if ok else 'FAIL'}  {name}"
        terminalreporter.write_line(f"{line}  [{detail}]" if detail else line)
    n_pass = sum(ok for _, ok, _ in _ACCEPTANCE)
    terminalreporter.write_line(f"{n_pass}/{len(_ACCEPTANCE)} acceptance checks passed")
