"""
Check Schemas
=========================

Includes:
- CheckFailure: one failed sample with its witness
- SuiteResult: outcome of one invariant suite
- CheckReport: every suite run by one invocation
"""
from typing import Any, Dict, List
from pydantic import BaseModel, Field
from app.models.enums.methods import CheckSuite

class CheckFailure(BaseModel):
    """
    Fields:
        detail (str): what failed.
        witness (Dict[str, Any]): the sample and the violated quantity.
    """
    detail: str
    witness: Dict[str, Any] = Field(default_factory=dict)

class SuiteResult(BaseModel):
    """
    Fields:
        suite (CheckSuite): suite name.
        samples (int): number of checked samples.
        tolerance (float): pass threshold of the suite metric.
        worst (float): largest metric over the samples.
        passed (bool): no failure recorded.
        failures (List[CheckFailure]): witnesses, in sample order.
    """
    suite: CheckSuite
    samples: int
    tolerance: float
    worst: float = 0.0
    passed: bool = True
    failures: List[CheckFailure] = Field(default_factory=list)

class CheckReport(BaseModel):
    seed: int
    suites: List[SuiteResult]

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)

    def witnesses(self) -> List[Dict[str, Any]]:
        return [{"suite": s.suite.value, "detail": f.detail, **f.witness} for s in self.suites for f in s.failures]
