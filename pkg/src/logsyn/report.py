"""Checklist reports shared by the verification commands."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class CheckItem:
    label: str
    passed: bool
    detail: str = ""


@dataclass
class Report:
    name: str
    items: list[CheckItem] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def add(self, label: str, passed: bool, detail: str = "") -> bool:
        self.items.append(CheckItem(label, bool(passed), detail))
        return bool(passed)

    @property
    def passed(self) -> bool:
        return all(item.passed for item in self.items)

    def failures(self) -> list[CheckItem]:
        return [item for item in self.items if not item.passed]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "items": [{"label": it.label, "pass": it.passed, "detail": it.detail} for it in self.items],
            "data": self.data,
        }

    def render(self) -> str:
        lines = [f"{self.name}: {'PASS' if self.passed else 'FAIL'}"]
        for it in self.items:
            mark = "PASS" if it.passed else "FAIL"
            lines.append(f"  [{mark}] {it.label}" + (f"  ({it.detail})" if it.detail else ""))
        return "\n".join(lines)
