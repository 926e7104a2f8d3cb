"""Package-wide error taxonomy.

SolspaceError marks domain failures (infeasible seeds, bad problem files,
non-nested trade-offs); the CLI turns them into exit code 2, while usage
errors exit 1 and genuine bugs propagate as ordinary tracebacks.
"""


class SolspaceError(Exception):
    """Base class for expected domain failures."""
