TOL = 1e-9
