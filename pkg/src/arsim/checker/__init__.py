"""Predicates, trace checks and small-scope exhaustive exploration."""

from .predicates import (Pred, eval_predicate, in_as, in_as_double_prime, in_as_prime,
                         in_s1, in_s2, in_t, leader_clause, predicate_fn)

__all__ = ["Pred", "eval_predicate", "in_as", "in_as_double_prime", "in_as_prime",
           "in_s1", "in_s2", "in_t", "leader_clause", "predicate_fn"]
