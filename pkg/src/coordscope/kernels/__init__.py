"""Hot numeric kernels with two interchangeable backends.

``COORDSCOPE_BACKEND=numpy`` forces the pure-numpy path; otherwise the numba
path is used when numba imports cleanly. Both modules expose the same
functions with the same signatures:

- ``dynamic_value``, ``dynamic_gradient``, ``dynamic_hessian``
- ``subblock_pd_flags``
- ``project_simplex``, ``pgd_simplex``
"""

import os


def _select():
    requested = os.environ.get("COORDSCOPE_BACKEND", "").strip().lower()
    if requested == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if requested == "numba":
            raise
        return "numpy"
    return "numba"


BACKEND = _select()

if BACKEND == "numba":
    from coordscope.kernels._numba import (  # noqa: F401
        dynamic_gradient,
        dynamic_hessian,
        dynamic_value,
        pgd_simplex,
        project_simplex,
        subblock_pd_flags,
    )
else:
    from coordscope.kernels._numpy import (  # noqa: F401
        dynamic_gradient,
        dynamic_hessian,
        dynamic_value,
        pgd_simplex,
        project_simplex,
        subblock_pd_flags,
    )
