"""Numerical tolerances shared by the whole package.

Values are roughly 100x double precision epsilon, scaled for the small
dimensions (n <= 64) this package works with.
"""

#: max ||Q^H Q - I||_F accepted for a stored orthonormal representative
ORTHO_TOL = 1e-10
#: slack used when checking geometric identities (symmetry, invariance, ...)
PROPERTY_TOL = 1e-9
#: relative singular value below which a matrix is treated as rank deficient
RANK_RTOL = 1e-12
#: eigengap below which a Grassmann centroid is flagged as non-unique
EIGENGAP_TOL = 1e-12
#: slack for monotone sequences (Lloyd distortion, HOOI fit)
MONOTONE_TOL = 1e-10
#: relative magnitude an entry needs to count as "nonzero" for phase fixing
PHASE_RTOL = 1e-8
#: diagonal jitter added when a log-det Cholesky factorisation fails
LOGDET_JITTER = 1e-12
