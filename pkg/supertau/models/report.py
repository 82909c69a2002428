"""
Verification results.

A Report is the serializable outcome of one suite; each CheckResult holds
one identity evaluated exactly, with the offending residue on failure.
"""
import json
from dataclasses import dataclass, field

PASS = "pass"
FAIL = "fail"


@dataclass
class CheckResult:
    check_id: str
    status: str
    runtime: float = 0.0
    residue: str = None
    witness: str = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.status == PASS

    def to_dict(self, include_runtime=True):
        data = {"id": self.check_id, "status": self.status}
        if include_runtime:
            data["runtime"] = round(self.runtime, 6)
        if self.residue is not None:
            data["residue"] = self.residue
        if self.witness is not None:
            data["witness"] = self.witness
        if self.details:
            data["details"] = self.details
        return data

    @classmethod
    def from_dict(cls, data):
        return cls(
            check_id=data["id"],
            status=data["status"],
            runtime=data.get("runtime", 0.0),
            residue=data.get("residue"),
            witness=data.get("witness"),
            details=data.get("details", {}),
        )

    def __repr__(self):
        return f"<CheckResult {self.check_id} {self.status}>"


@dataclass
class Report:
    suite: str
    checks: list = field(default_factory=list)
    environment: dict = field(default_factory=dict)
    timestamp: str = None

    def add(self, result):
        self.checks.append(result)
        return result

    def extend(self, results):
        self.checks.extend(results)

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    @property
    def failures(self):
        return [check for check in self.checks if not check.passed]

    @property
    def exit_code(self):
        return 0 if self.passed else 1

    def sort(self):
        self.checks.sort(key=lambda check: check.check_id)
        return self

    def to_dict(self, include_timestamp=True, include_runtime=True):
        data = {
            "suite": self.suite,
            "passed": self.passed,
            "environment": self.environment,
            "checks": [c.to_dict(include_runtime) for c in self.checks],
        }
        if include_timestamp and self.timestamp is not None:
            data["timestamp"] = self.timestamp
        return data

    def to_json(self, include_timestamp=True, include_runtime=True):
        return json.dumps(self.to_dict(include_timestamp, include_runtime),
                          indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        return cls(
            suite=data["suite"],
            checks=[CheckResult.from_dict(c) for c in data.get("checks", [])],
            environment=data.get("environment", {}),
            timestamp=data.get("timestamp"),
        )

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        return f"<Report {self.suite} checks={len(self.checks)} passed={self.passed}>"
