"""Baseline JFIF marker-level parsing."""

from dataclasses import dataclass, field

import numpy as np

from .huffman import HuffmanTable
from .quant import QuantTable

# Markers
SOI = 0xD8
EOI = 0xD9
SOS = 0xDA
DQT = 0xDB
DRI = 0xDD
DHT = 0xC4
COM = 0xFE
SOF0 = 0xC0
SOF1 = 0xC1

# SOFn markers for modes this codec rejects outright.
_UNSUPPORTED_SOF = {
    0xC2: "progressive",
    0xC3: "lossless",
    0xC5: "differential sequential",
    0xC6: "differential progressive",
    0xC7: "differential lossless",
    0xC9: "arithmetic sequential",
    0xCA: "arithmetic progressive",
    0xCB: "arithmetic lossless",
    0xCD: "differential arithmetic sequential",
    0xCE: "differential arithmetic progressive",
    0xCF: "differential arithmetic lossless",
}


class JpegFormatError(ValueError):
    """Malformed or unsupported JPEG input; carries the byte offset."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class UnsupportedModeError(JpegFormatError):
    pass


@dataclass
class FrameComponent:
    ident: int
    h: int          # horizontal sampling factor
    v: int          # vertical sampling factor
    quant_table_id: int
    dc_table_id: int = None   # bound at SOS
    ac_table_id: int = None


@dataclass
class JpegStream:
    width: int = 0
    height: int = 0
    components: list = field(default_factory=list)   # scan order
    quant_tables: dict = field(default_factory=dict)
    dc_tables: dict = field(default_factory=dict)
    ac_tables: dict = field(default_factory=dict)
    restart_interval: int = 0
    entropy_data: bytes = b""   # raw scan bytes, stuffing and RST markers intact

    @property
    def max_h(self):
        return max(c.h for c in self.components)

    @property
    def max_v(self):
        return max(c.v for c in self.components)


def _u16(data, off):
    return (data[off] << 8) | data[off + 1]


def parse_stream(data):
    """Parse baseline sequential JFIF bytes into a JpegStream."""
    data = bytes(data)
    if len(data) < 4 or data[0] != 0xFF or data[1] != SOI:
        raise JpegFormatError("missing SOI marker", 0)

    stream = JpegStream()
    pos = 2
    saw_frame = False
    saw_eoi = False

    while pos < len(data):
        if data[pos] != 0xFF:
            raise JpegFormatError(f"expected marker, got {data[pos]:#04x}", pos)
        # Optional fill bytes before a marker
        while pos < len(data) and data[pos] == 0xFF and pos + 1 < len(data) and data[pos + 1] == 0xFF:
            pos += 1
        if pos + 1 >= len(data):
            raise JpegFormatError("truncated marker", pos)
        marker = data[pos + 1]
        mark_off = pos
        pos += 2

        if marker == EOI:
            saw_eoi = True
            break
        if marker == SOI:
            raise JpegFormatError("unexpected second SOI", mark_off)
        if marker in _UNSUPPORTED_SOF:
            raise UnsupportedModeError(
                f"unsupported mode: {_UNSUPPORTED_SOF[marker]} JPEG", mark_off)

        if pos + 2 > len(data):
            raise JpegFormatError("truncated segment length", pos)
        seg_len = _u16(data, pos)
        if seg_len < 2 or pos + seg_len > len(data):
            raise JpegFormatError("segment overruns file", pos)
        body = data[pos + 2:pos + seg_len]
        body_off = pos + 2

        if marker == DQT:
            _parse_dqt(body, body_off, stream)
        elif marker == DHT:
            _parse_dht(body, body_off, stream)
        elif marker == DRI:
            if len(body) != 2:
                raise JpegFormatError("bad DRI length", body_off)
            stream.restart_interval = _u16(body, 0)
        elif marker in (SOF0, SOF1):
            _parse_sof(body, body_off, stream)
            saw_frame = True
        elif marker == SOS:
            if not saw_frame:
                raise JpegFormatError("SOS before SOF", mark_off)
            scan_start = _parse_sos(body, body_off, stream)
            pos = pos + seg_len
            pos = _locate_scan(data, pos, stream)
            continue
        # APPn / COM / other tolerated segments are skipped.
        pos += seg_len

    if not saw_eoi:
        raise JpegFormatError("missing EOI marker", len(data))
    if not saw_frame:
        raise JpegFormatError("missing SOF marker", len(data))
    if not stream.entropy_data:
        raise JpegFormatError("missing SOS scan", len(data))
    return stream


def _parse_dqt(body, off, stream):
    i = 0
    while i < len(body):
        pq = body[i] >> 4
        tq = body[i] & 0x0F
        i += 1
        if pq not in (0, 1):
            raise JpegFormatError("bad quant table precision", off + i - 1)
        n = 64 if pq == 0 else 128
        if i + n > len(body):
            raise JpegFormatError("truncated quant table", off + i)
        if pq == 0:
            vals = np.frombuffer(body[i:i + 64], dtype=np.uint8).astype(np.int64)
        else:
            vals = np.frombuffer(body[i:i + 128], dtype=">u2").astype(np.int64)
        stream.quant_tables[tq] = QuantTable(vals)
        i += n


def _parse_dht(body, off, stream):
    i = 0
    while i < len(body):
        tc = body[i] >> 4
        th = body[i] & 0x0F
        i += 1
        if i + 16 > len(body):
            raise JpegFormatError("truncated Huffman table", off + i)
        bits = tuple(body[i:i + 16])
        i += 16
        n = sum(bits)
        if i + n > len(body):
            raise JpegFormatError("truncated Huffman table values", off + i)
        table = HuffmanTable(bits=bits, values=tuple(body[i:i + n]))
        i += n
        if tc == 0:
            stream.dc_tables[th] = table
        elif tc == 1:
            stream.ac_tables[th] = table
        else:
            raise JpegFormatError("bad Huffman table class", off)


def _parse_sof(body, off, stream):
    if len(body) < 6:
        raise JpegFormatError("truncated SOF", off)
    precision = body[0]
    if precision != 8:
        raise UnsupportedModeError(f"unsupported mode: {precision}-bit precision", off)
    stream.height = _u16(body, 1)
    stream.width = _u16(body, 3)
    ncomp = body[5]
    if stream.width < 1 or stream.height < 1:
        raise JpegFormatError("bad frame dimensions", off)
    if len(body) != 6 + 3 * ncomp:
        raise JpegFormatError("bad SOF length", off)
    for c in range(ncomp):
        ident, hv, tq = body[6 + 3 * c:9 + 3 * c]
        h, v = hv >> 4, hv & 0x0F
        if not (1 <= h <= 4 and 1 <= v <= 4):
            raise JpegFormatError("bad sampling factors", off)
        stream.components.append(FrameComponent(ident=ident, h=h, v=v, quant_table_id=tq))


def _parse_sos(body, off, stream):
    ncomp = body[0]
    if len(body) != 1 + 2 * ncomp + 3:
        raise JpegFormatError("bad SOS length", off)
    by_id = {c.ident: c for c in stream.components}
    for i in range(ncomp):
        ident = body[1 + 2 * i]
        tables = body[2 + 2 * i]
        comp = by_id.get(ident)
        if comp is None:
            raise JpegFormatError(f"scan references unknown component {ident}", off)
        comp.dc_table_id = tables >> 4
        comp.ac_table_id = tables & 0x0F
        if comp.dc_table_id not in stream.dc_tables:
            raise JpegFormatError("table id referenced but undefined (DC)", off)
        if comp.ac_table_id not in stream.ac_tables:
            raise JpegFormatError("table id referenced but undefined (AC)", off)
        if comp.quant_table_id not in stream.quant_tables:
            raise JpegFormatError("table id referenced but undefined (quant)", off)
    return off + len(body)


def _locate_scan(data, pos, stream):
    """Collect entropy-coded bytes until the next real marker."""
    start = pos
    while pos < len(data) - 1:
        if data[pos] == 0xFF:
            nxt = data[pos + 1]
            if nxt == 0x00 or 0xD0 <= nxt <= 0xD7:
                pos += 2
                continue
            break
        pos += 1
    else:
        raise JpegFormatError("truncated scan", len(data))
    stream.entropy_data = data[start:pos]
    return pos
