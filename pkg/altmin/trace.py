"""
AltMinDict 的逐次迭代记录
"""
import csv
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, TextIO

TRACE_COLUMNS = ["iter", "eps_t", "dict_change", "err", "seconds"]


@dataclass
class AltMinTrace:
    """
    每次迭代的精度、字典变化量、相对真值的误差和耗时

    Attributes:
        eps: ε_t
        dict_change: dict_error(A(t+1), A(t))
        err: dict_error(A(t+1), 真值)；未提供真值时为 None
        seconds: 本次迭代耗时
        reinitialized: 本次迭代中因范数塌缩而回退的列
    """
    eps: List[float] = field(default_factory=list)
    dict_change: List[float] = field(default_factory=list)
    err: List[Optional[float]] = field(default_factory=list)
    seconds: List[float] = field(default_factory=list)
    reinitialized: List[List[int]] = field(default_factory=list)

    def record(self, eps: float, dict_change: float, err: Optional[float], seconds: float,
               reinitialized: Optional[List[int]] = None) -> None:
        self.eps.append(float(eps))
        self.dict_change.append(float(dict_change))
        self.err.append(None if err is None else float(err))
        self.seconds.append(float(seconds))
        self.reinitialized.append(list(reinitialized or []))

    def __len__(self) -> int:
        return len(self.eps)

    @property
    def final_err(self) -> Optional[float]:
        return self.err[-1] if self.err else None

    def err_monotone(self, slack: float = 0.0) -> bool:
        """误差序列是否单调不增（允许 slack 的相对回升）"""
        errs = [e for e in self.err if e is not None]
        return all(b <= a * (1 + slack) for a, b in zip(errs, errs[1:]))

    def rows(self) -> List[Dict[str, Any]]:
        return [
            {"iter": t, "eps_t": self.eps[t], "dict_change": self.dict_change[t],
             "err": "" if self.err[t] is None else self.err[t], "seconds": self.seconds[t]}
            for t in range(len(self))
        ]

    def write_csv(self, stream: TextIO) -> None:
        writer = csv.DictWriter(stream, fieldnames=TRACE_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.rows())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "iterations": len(self),
            "eps": self.eps,
            "dict_change": self.dict_change,
            "err": self.err,
            "reinitialized": self.reinitialized,
        }
