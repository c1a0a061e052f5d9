"""Deterministic check reports.

A report echoes the command and seed, lists one record per check
(name, status, witness) sorted by name, and carries summary counts.
The machine-readable form is a line-oriented text document that is
byte-identical across reruns with the same inputs and seed; wall time
appears only in the human rendering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

from .errors import ParseError

FORMAT_HEADER = "finhom-report 1"


def _escape(s: str) -> str:
    return (s.replace("\\", "\\\\").replace("\t", "\\t")
            .replace("\n", "\\n").replace("\r", "\\r"))


def _unescape(s: str) -> str:
    out = []
    it = iter(range(len(s)))
    i = 0
    while i < len(s):
        c = s[i]
        if c == "\\" and i + 1 < len(s):
            nxt = s[i + 1]
            out.append({"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}.get(nxt, nxt))
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


@dataclass(frozen=True)
class CheckRecord:
    name: str
    passed: bool
    witness: str = ""

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"


@dataclass
class Report:
    command: str
    seed: int
    checks: List[CheckRecord] = field(default_factory=list)
    wall_time: float = 0.0

    def add(self, name: str, passed: bool, witness: str = ""):
        self.checks.append(CheckRecord(name, passed, witness))

    @property
    def pass_count(self) -> int:
        return sum(1 for c in self.checks if c.passed)

    @property
    def fail_count(self) -> int:
        return sum(1 for c in self.checks if not c.passed)

    @property
    def all_pass(self) -> bool:
        return self.fail_count == 0

    @property
    def exit_code(self) -> int:
        return 0 if self.all_pass else 1

    def sorted_checks(self) -> List[CheckRecord]:
        return sorted(self.checks, key=lambda c: c.name)

    def to_machine(self) -> str:
        lines = [FORMAT_HEADER,
                 f"command\t{_escape(self.command)}",
                 f"seed\t{self.seed}"]
        for c in self.sorted_checks():
            lines.append(f"check\t{_escape(c.name)}\t{c.status}\t{_escape(c.witness)}")
        lines.append(f"summary\tpass={self.pass_count}\tfail={self.fail_count}")
        return "\n".join(lines) + "\n"

    def to_human(self) -> str:
        lines = [f"command: {self.command}", f"seed: {self.seed}"]
        for c in self.sorted_checks():
            line = f"  [{c.status:>4}] {c.name}"
            if c.witness:
                line += f"  -- {c.witness}"
            lines.append(line)
        lines.append(f"summary: {self.pass_count} passed, {self.fail_count} failed")
        lines.append(f"wall-time: {self.wall_time:.3f}s")
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_machine(text: str) -> "Report":
        lines = text.splitlines()
        if not lines or lines[0] != FORMAT_HEADER:
            raise ParseError("not a machine-readable report", line=1)
        report = Report(command="", seed=0)
        summary_seen = False
        for idx, line in enumerate(lines[1:], start=2):
            parts = line.split("\t")
            key = parts[0]
            if key == "command":
                report.command = _unescape(parts[1]) if len(parts) > 1 else ""
            elif key == "seed":
                report.seed = int(parts[1])
            elif key == "check":
                if len(parts) != 4:
                    raise ParseError("malformed check record", line=idx)
                report.add(_unescape(parts[1]), parts[2] == "pass", _unescape(parts[3]))
            elif key == "summary":
                summary_seen = True
                declared_pass = int(parts[1].split("=")[1])
                declared_fail = int(parts[2].split("=")[1])
                if (declared_pass, declared_fail) != (report.pass_count, report.fail_count):
                    raise ParseError("summary counts disagree with records", line=idx)
            else:
                raise ParseError(f"unknown report line {key!r}", line=idx)
        if not summary_seen:
            raise ParseError("report missing its summary line")
        return report
