"""Pass/fail lines collected by the acceptance tests and printed at the end of a run."""

LINES: list[str] = []
