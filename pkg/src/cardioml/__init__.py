"""Cardiovascular-risk tabular ML benchmark: ingestion, native learners, calibration, tuning."""

__version__ = "0.1.0"
