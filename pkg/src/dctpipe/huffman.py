"""Baseline Huffman entropy coding of DPCM/RLE symbols (T.81 Annexes C, F, K)."""

from dataclasses import dataclass, field

import numpy as np

from .rle import EOB, ZRL


@dataclass
class HuffmanTable:
    """Canonical Huffman table given as (counts per code length 1..16, values)."""
    bits: tuple          # 16 counts
    values: tuple        # symbols in code order
    codes: dict = field(default_factory=dict, repr=False)   # symbol -> (code, length)
    mincode: np.ndarray = field(default=None, repr=False)
    maxcode: np.ndarray = field(default=None, repr=False)
    valptr: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self.bits = tuple(self.bits)
        self.values = tuple(self.values)
        if len(self.bits) != 16:
            raise ValueError("need 16 code-length counts")
        if sum(self.bits) != len(self.values):
            raise ValueError("value count does not match code-length counts")
        # Canonical code assignment (T.81 C.2) plus the F.2.2.3 decode arrays.
        self.mincode = np.zeros(17, dtype=np.int64)
        self.maxcode = np.full(17, -1, dtype=np.int64)
        self.valptr = np.zeros(17, dtype=np.int64)
        code = 0
        k = 0
        for length in range(1, 17):
            n = self.bits[length - 1]
            self.valptr[length] = k
            self.mincode[length] = code
            for _ in range(n):
                self.codes[self.values[k]] = (code, length)
                code += 1
                k += 1
            if n:
                self.maxcode[length] = code - 1
            code <<= 1


def _std(bits, values):
    return HuffmanTable(bits=bits, values=values)


STD_DC_LUMA = _std(
    (0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0),
    tuple(range(12)),
)
STD_DC_CHROMA = _std(
    (0, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0),
    tuple(range(12)),
)
STD_AC_LUMA = _std(
    (0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 0x7D),
    (
        0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12,
        0x21, 0x31, 0x41, 0x06, 0x13, 0x51, 0x61, 0x07,
        0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xA1, 0x08,
        0x23, 0x42, 0xB1, 0xC1, 0x15, 0x52, 0xD1, 0xF0,
        0x24, 0x33, 0x62, 0x72, 0x82, 0x09, 0x0A, 0x16,
        0x17, 0x18, 0x19, 0x1A, 0x25, 0x26, 0x27, 0x28,
        0x29, 0x2A, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39,
        0x3A, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49,
        0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59,
        0x5A, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69,
        0x6A, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79,
        0x7A, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89,
        0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98,
        0x99, 0x9A, 0xA2, 0xA3, 0xA4, 0xA5, 0xA6, 0xA7,
        0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4, 0xB5, 0xB6,
        0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3, 0xC4, 0xC5,
        0xC6, 0xC7, 0xC8, 0xC9, 0xCA, 0xD2, 0xD3, 0xD4,
        0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA, 0xE1, 0xE2,
        0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9, 0xEA,
        0xF1, 0xF2, 0xF3, 0xF4, 0xF5, 0xF6, 0xF7, 0xF8,
        0xF9, 0xFA,
    ),
)
STD_AC_CHROMA = _std(
    (0, 2, 1, 2, 4, 4, 3, 4, 7, 5, 4, 4, 0, 1, 2, 0x77),
    (
        0x00, 0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21,
        0x31, 0x06, 0x12, 0x41, 0x51, 0x07, 0x61, 0x71,
        0x13, 0x22, 0x32, 0x81, 0x08, 0x14, 0x42, 0x91,
        0xA1, 0xB1, 0xC1, 0x09, 0x23, 0x33, 0x52, 0xF0,
        0x15, 0x62, 0x72, 0xD1, 0x0A, 0x16, 0x24, 0x34,
        0xE1, 0x25, 0xF1, 0x17, 0x18, 0x19, 0x1A, 0x26,
        0x27, 0x28, 0x29, 0x2A, 0x35, 0x36, 0x37, 0x38,
        0x39, 0x3A, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48,
        0x49, 0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58,
        0x59, 0x5A, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68,
        0x69, 0x6A, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78,
        0x79, 0x7A, 0x82, 0x83, 0x84, 0x85, 0x86, 0x87,
        0x88, 0x89, 0x8A, 0x92, 0x93, 0x94, 0x95, 0x96,
        0x97, 0x98, 0x99, 0x9A, 0xA2, 0xA3, 0xA4, 0xA5,
        0xA6, 0xA7, 0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4,
        0xB5, 0xB6, 0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3,
        0xC4, 0xC5, 0xC6, 0xC7, 0xC8, 0xC9, 0xCA, 0xD2,
        0xD3, 0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA,
        0xE2, 0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9,
        0xEA, 0xF2, 0xF3, 0xF4, 0xF5, 0xF6, 0xF7, 0xF8,
        0xF9, 0xFA,
    ),
)


def magnitude_category(value):
    """Size category of a DC difference or AC amplitude (0 for zero)."""
    return int(value).bit_length() if value >= 0 else int(-value).bit_length()


def amplitude_bits(value, size):
    """The `size` low bits representing `value` (one's-complement for negatives)."""
    if value < 0:
        value += (1 << size) - 1
    return value


class BitWriter:
    """MSB-first bit packer with JPEG byte stuffing (0xFF -> 0xFF 0x00)."""

    def __init__(self):
        self._out = bytearray()
        self._acc = 0
        self._nbits = 0

    def write(self, code, length):
        self._acc = (self._acc << length) | (code & ((1 << length) - 1))
        self._nbits += length
        while self._nbits >= 8:
            self._nbits -= 8
            byte = (self._acc >> self._nbits) & 0xFF
            self._out.append(byte)
            if byte == 0xFF:
                self._out.append(0x00)
        self._acc &= (1 << self._nbits) - 1

    def flush(self):
        """Pad the final partial byte with 1-bits."""
        if self._nbits:
            pad = 8 - self._nbits
            self.write((1 << pad) - 1, pad)
        return bytes(self._out)


class BitReader:
    """MSB-first bit reader over already-unstuffed scan bytes."""

    def __init__(self, data):
        self.data = data
        self.pos = 0
        self.bit = 0

    def read_bit(self):
        if self.pos >= len(self.data):
            raise ValueError("truncated scan")
        b = (self.data[self.pos] >> (7 - self.bit)) & 1
        self.bit += 1
        if self.bit == 8:
            self.bit = 0
            self.pos += 1
        return b

    def read_bits(self, n):
        v = 0
        for _ in range(n):
            v = (v << 1) | self.read_bit()
        return v

    def at_end(self):
        """True once only pad bits can remain (inside the final byte)."""
        return self.pos >= len(self.data)


def unstuff(data):
    """Remove 0x00 stuffing bytes after 0xFF inside scan data."""
    return bytes(data).replace(b"\xff\x00", b"\xff")


def _encode_dc(writer, diff, table):
    size = magnitude_category(diff)
    if size not in table.codes:
        raise ValueError(f"unencodable symbol: DC size {size}")
    code, length = table.codes[size]
    writer.write(code, length)
    if size:
        writer.write(amplitude_bits(diff, size), size)


def _encode_ac(writer, symbols, table):
    for run, value in symbols:
        if (run, value) in (EOB, ZRL):
            rs = (run << 4)
        else:
            size = magnitude_category(value)
            rs = (run << 4) | size
        if rs not in table.codes:
            raise ValueError(f"unencodable symbol: run/size {rs:#04x}")
        code, length = table.codes[rs]
        writer.write(code, length)
        if rs & 0x0F:
            writer.write(amplitude_bits(value, rs & 0x0F), rs & 0x0F)


def encode_block(writer, dc_diff, ac_symbols, dc_table, ac_table):
    _encode_dc(writer, dc_diff, dc_table)
    _encode_ac(writer, ac_symbols, ac_table)


def entropy_encode(dc_diffs, ac_blocks, dc_table=STD_DC_LUMA, ac_table=STD_AC_LUMA):
    """Encode one component's DPCM diffs + per-block AC symbols to scan bytes."""
    if len(dc_diffs) != len(ac_blocks):
        raise ValueError("one AC symbol list per block required")
    writer = BitWriter()
    for diff, symbols in zip(dc_diffs, ac_blocks):
        encode_block(writer, int(diff), symbols, dc_table, ac_table)
    return writer.flush()


def _decode_symbol(reader, table):
    code = 0
    for length in range(1, 17):
        code = (code << 1) | reader.read_bit()
        if table.maxcode[length] >= 0 and code <= table.maxcode[length]:
            return table.values[table.valptr[length] + code - table.mincode[length]]
    raise ValueError("corrupt entropy stream: invalid prefix code")


def _extend(value, size):
    if value < (1 << (size - 1)):
        value -= (1 << size) - 1
    return value


def decode_block(reader, dc_table, ac_table):
    """Decode one block -> (dc_diff, ac symbol list)."""
    size = _decode_symbol(reader, dc_table)
    diff = _extend(reader.read_bits(size), size) if size else 0
    symbols = []
    k = 1
    while k < 64:
        rs = _decode_symbol(reader, ac_table)
        run, size = rs >> 4, rs & 0x0F
        if size == 0:
            if run == 15:
                symbols.append(ZRL)
                k += 16
                if k > 64:
                    raise ValueError("corrupt run length")
                continue
            symbols.append(EOB)
            break
        k += run
        if k > 63:
            raise ValueError("corrupt run length")
        value = _extend(reader.read_bits(size), size)
        symbols.append((run, value))
        k += 1
    return diff, symbols


def entropy_decode(data, n_blocks, dc_table=STD_DC_LUMA, ac_table=STD_AC_LUMA):
    """Exact inverse of entropy_encode for `n_blocks` blocks."""
    reader = BitReader(unstuff(data))
    diffs = []
    blocks = []
    for _ in range(n_blocks):
        diff, symbols = decode_block(reader, dc_table, ac_table)
        diffs.append(diff)
        blocks.append(symbols)
    return np.array(diffs, dtype=np.int64), blocks
