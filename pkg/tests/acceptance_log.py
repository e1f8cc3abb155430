"""Collects one pass/fail line per acceptance criterion for the terminal
summary."""

LINES: list[str] = []


def record(criterion: str, passed: bool, detail: str) -> bool:
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}"
    LINES.append(line)
    print(line)
    return passed
