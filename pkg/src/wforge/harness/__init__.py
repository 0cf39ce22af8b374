"""Verification suites and the command-line interface."""

from .suites import SUITE_NAMES, CheckResult, SuiteReport, run_suite

__all__ = ["SUITE_NAMES", "CheckResult", "SuiteReport", "run_suite"]
