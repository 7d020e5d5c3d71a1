"""Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""

LINES = {}


def record(label, ok, detail):
    LINES[label] = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
