"""Deterministic two-part reports: sorted ``key = value`` lines, then prose."""

from __future__ import annotations

from fractions import Fraction

from ..dirac import GeneralizedSection, format_section
from ..exterior import ExteriorElement, format_element
from ..scalar import Scalar


def fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "%.12g" % (value + 0.0)
    if isinstance(value, (int, Fraction, Scalar)):
        return str(value)
    if isinstance(value, ExteriorElement):
        return format_element(value)
    if isinstance(value, GeneralizedSection):
        return format_section(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(fmt(v) for v in value) + "]"
    if value is None:
        return "none"
    return str(value)


class Report:
    def __init__(self, command: str, scene: str):
        self.machine: dict[str, str] = {}
        self.human: list[str] = []
        self.put("command", command)
        self.put("scene", scene)

    def put(self, key: str, value) -> None:
        if key in self.machine:
            raise KeyError(f"duplicate report key {key!r}")
        text = fmt(value)
        if "\n" in text:
            raise ValueError("report values are single-line")
        self.machine[key] = text

    def say(self, line: str = "") -> None:
        self.human.append(line)

    def machine_text(self) -> str:
        return "".join(f"{k} = {self.machine[k]}\n" for k in sorted(self.machine))

    def render(self, machine_only: bool = False) -> str:
        out = "[machine]\n" + self.machine_text()
        if not machine_only:
            out += "\n[human]\n" + "".join(line + "\n" for line in self.human)
        return out
