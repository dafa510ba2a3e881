"""Shared reference values for the test suite.

The tan(delta) references are converged to about 1e-10: both extraction
routes, both solvers at their respective convergence floors, and domain
sizes where the potential tails are below the matching bias threshold all
agree on these digits.
"""

REF_TAN_MORSE = 2.6994702502
REF_TAN_WOODS_SAXON = -1.7107344227
K_REF = 0.5
