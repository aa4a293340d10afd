"""
floqeels.internal
~~~~~~~~~~~~~~~~~

Numerical building blocks shared by the solvers. Nothing in here is part of
the public API.

"""
