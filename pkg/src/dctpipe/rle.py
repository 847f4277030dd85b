"""Run-length coding of the 63 zigzag AC coefficients of a block.

Symbols are (run, value) pairs with the two special baseline-JPEG symbols
encoded in the usual way: EOB = (0, 0) ends the block, ZRL = (15, 0) stands
for sixteen zeros.
"""

import numpy as np

EOB = (0, 0)
ZRL = (15, 0)


def rle_encode(ac):
    """63 zigzag AC values -> list of (run, value) symbols."""
    ac = np.asarray(ac, dtype=np.int64).reshape(-1)
    if ac.size != 63:
        raise ValueError("expected 63 AC values")
    symbols = []
    run = 0
    pending_zrl = 0
    for v in ac:
        if v == 0:
            run += 1
            if run == 16:
                pending_zrl += 1
                run = 0
        else:
            symbols.extend([ZRL] * pending_zrl)
            pending_zrl = 0
            symbols.append((run, int(v)))
            run = 0
    if run or pending_zrl:
        symbols.append(EOB)
    return symbols


def rle_decode(symbols):
    """Symbol sequence -> 63 AC values."""
    ac = np.zeros(63, dtype=np.int64)
    k = 0
    for idx, (run, value) in enumerate(symbols):
        if (run, value) == EOB:
            if idx != len(symbols) - 1:
                raise ValueError("corrupt run length: EOB before end of sequence")
            return ac
        if (run, value) == ZRL:
            k += 16
            if k > 63:
                raise ValueError("corrupt run length")
            continue
        if value == 0 or not 0 <= run <= 15:
            raise ValueError("corrupt run length: bad symbol")
        k += run
        if k > 62:
            raise ValueError("corrupt run length")
        ac[k] = value
        k += 1
    if k != 63:
        raise ValueError("corrupt run length: block not filled and no EOB")
    return ac
