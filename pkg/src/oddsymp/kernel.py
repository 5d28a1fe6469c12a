"""Select the compiled kernel when it is built, else the pure-Python one.

Set ``ODDSYMP_PURE=1`` to force the fallback.
"""

import os

from oddsymp import _purekernel

FIELD_BITS = _purekernel.FIELD_BITS
FIELD_MASK = _purekernel.FIELD_MASK

if os.environ.get("ODDSYMP_PURE", "") not in ("", "0"):
    _impl = _purekernel
else:
    try:
        from oddsymp import _speedups as _impl
    except ImportError:
        _impl = _purekernel

BACKEND = "compiled" if _impl is not _purekernel else "pure"

odd_sign = _impl.odd_sign
mul_terms = _impl.mul_terms
add_terms = _impl.add_terms
derive_odd = _impl.derive_odd
derive_even = _impl.derive_even
