"""Frozen reference values for the test suite.

DERIVED values were computed once outside the package: the profile ODE
was restated and integrated with mpmath's Taylor solver at 25 digits,
the free boundary located as the first zero of the R^3 cross product of
``x`` and ``x_t`` in the ``s = 0`` slice, and necks found by mpmath root
finding.  QUOTED values restate published statements.
"""

import math

# QUOTED: radii listed left to right under the profile-curve figure.
FIGURE_RADII = (0.22, 0.98, 1.5708, 1.95, 1.84)
FIGURE_RADIUS_TOL = 0.01
# QUOTED: index plus nullity of the Steklov-type form on both reference surfaces.
IND0_QS = 4
IND_QS, NUL_QS = 1, 3
# QUOTED: condition value for the Gaussian profile phi = -r^2/(4n) is -r/(4 n^2).
def gaussian_condition(r, n=2):
    return -r / (4 * n * n)

# DERIVED: Clifford neck and its free boundary.
CLIFFORD_R0 = 1 / math.sqrt(2)
CLIFFORD_T_PLUS = math.pi / 2
CLIFFORD_R = math.pi / 2

# DERIVED: t0 with t0 tanh t0 = 1 (critical catenoid neck parameter).
CATENOID_T0 = 1.19967864025773383391637

# DERIVED: necks of the free-boundary truncations with the given radius.
NECKS = {
    (0.98, "pre"): 0.894946916811041946197177,
    (0.22, "pre"): 0.9948615976948216928441162,
    (1.95, "pre"): 0.4473207759510984410538009,
    (1.95, "post"): 0.1964522104483958852239359,
    (1.84, "post"): 0.1017849226547058423613625,
}
# DERIVED: t_plus for two of the necks above.
T_PLUS = {(0.98, "pre"): 0.7317096478950799806508505417, (0.22, "pre"): 0.1234171878936293988232862912}

# DERIVED regression fixture: largest radius over the default 50-point sweep
# (grid value r0 = 0.3246875); the mpmath integration gives 1.996768484143072.
R_BAR_SWEEP50 = 1.9967684841423963
R0_BAR_SWEEP50 = 0.3246875
R_BAR_TOL = 1e-9
