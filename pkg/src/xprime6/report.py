"""Line-oriented verification reports: ``step.<id> = PASS|FAIL <detail>``."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable


@dataclass
class Step:
    id: str
    passed: bool
    detail: str
    anchor: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        text = f"step.{self.id} = {'PASS' if self.passed else 'FAIL'} {self.detail}".rstrip()
        if not self.passed and self.anchor:
            text += f" (claim: {self.anchor})"
        return text


@dataclass
class Report:
    steps: list[Step] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(s.passed for s in self.steps)

    def check(self, id: str, passed: bool, detail: str, anchor: str = "") -> Step:
        step = Step(id, bool(passed), detail, anchor)
        self.steps.append(step)
        return step

    def run(self, id: str, anchor: str, fn: Callable[[], tuple[bool, str]]) -> Step:
        """Run ``fn`` returning (passed, detail); exceptions become failures."""
        start = time.perf_counter()
        try:
            passed, detail = fn()
        except AssertionError as exc:
            passed, detail = False, f"assertion failed: {exc}"
        step = self.check(id, passed, detail, anchor)
        step.seconds = time.perf_counter() - start
        return step

    def extend(self, other: Report) -> Report:
        self.steps.extend(other.steps)
        return self

    def __getitem__(self, id: str) -> Step:
        for s in self.steps:
            if s.id == id:
                return s
        raise KeyError(id)

    def lines(self) -> list[str]:
        return [s.line() for s in self.steps]

    def __str__(self) -> str:
        return "\n".join(self.lines())
