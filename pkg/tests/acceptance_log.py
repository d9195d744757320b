LINES = []


def record(tag: str, ok: bool, detail: str = "") -> bool:
    line = f"{'PASS' if ok else 'FAIL'} {tag}" + (f": {detail}" if detail else "")
    LINES.append(line)
    print(line)
    return ok
