import functools

from hypothesis import settings

from mockheegner import heegner

settings.register_profile("default", deadline=None, print_blob=True)
settings.load_profile("default")

# criterion number -> (description, passed, detail); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


@functools.lru_cache(maxsize=None)
def construct_cached(p: int, case: int):
    """One construction per (p, case) for the whole session."""
    return heegner.construct(p, case)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        desc, ok, detail = ACCEPTANCE[n]
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {desc}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
