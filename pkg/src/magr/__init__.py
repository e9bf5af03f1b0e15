"""Connectivity measures for time series with gaps."""
