"""Exact zeta-regularized traces and determinant Hessians on round odd spheres."""
