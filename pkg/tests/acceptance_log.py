"""Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""

LINES: list[str] = []


def record(number: int, title: str, ok: bool, detail: str = "") -> str:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {title}" + (f"  [{detail}]" if detail else "")
    LINES.append(line)
    print(line)
    return line
