"""Participatory budgeting with interaction-aware ballots.

Library layout:

- ``model``: instances, votes, outcomes, utilities, feasibility.
- ``formats``: canonical JSON file formats.
- ``solvers``: greedy / exact / distinct-votes tallying plus dispatch.
- ``oracle``: exhaustive reference solver.
- ``profiles``: vote-profile classification (independent / substitute-chain
  structure) and deviant counting.
- ``strategy``: deviation search and equilibrium checks.
- ``gen``: random instance and profile generators.
- ``cli``: command-line front end.
- ``service``: HTTP election service.
"""

__version__ = "0.1.0"
