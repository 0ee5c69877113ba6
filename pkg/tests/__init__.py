# Tests for zeta-boundary-terms
