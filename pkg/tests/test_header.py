import binascii
import dataclasses

import numpy as np
import pytest

from covers import random_header
from rdhsort.bits import bits_to_bytes, bytes_to_bits
from rdhsort.errors import HeaderError
from rdhsort.header import Segment, crc16, decode_header, encode_header, header_bit_length


class TestCrc:
    def test_against_crc_hqx(self):
        rng = np.random.default_rng(0)
        for n in (0, 1, 7, 32, 100):
            data = rng.integers(0, 256, n, dtype=np.uint8).tobytes()
            assert crc16(bytes_to_bits(data)) == binascii.crc_hqx(data, 0xFFFF)

    def test_check_value(self):
        assert crc16(bytes_to_bits(b"123456789")) == 0x29B1


class TestHeader:
    def test_round_trip(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            h = random_header(rng)
            bits = encode_header(h)
            assert bits.size == header_bit_length(len(h.segments), h.n_subbands, len(h.ou_entries))
            padded = np.concatenate([bits, np.zeros(h.reserved_len - bits.size, np.uint8)])
            assert decode_header(padded) == h

    def test_magic(self):
        bits = encode_header(random_header(np.random.default_rng(2)))
        assert "".join(map(str, bits[:16])) == "0101001001000100"

    def test_byte_view(self):
        bits = encode_header(random_header(np.random.default_rng(2)))
        assert bits_to_bytes(bits)[:3] == b"RD\x01"

    def test_crc_flip(self):
        bits = encode_header(random_header(np.random.default_rng(3)))
        for i in (20, 60, bits.size - 1):
            bad = bits.copy()
            bad[i] ^= 1
            with pytest.raises(HeaderError):
                decode_header(bad)

    def test_bad_magic(self):
        bits = encode_header(random_header(np.random.default_rng(4)))
        bits[0] ^= 1
        with pytest.raises(HeaderError, match="magic"):
            decode_header(bits)

    def test_no_segments_inconsistent(self):
        h = random_header(np.random.default_rng(5))
        with pytest.raises(HeaderError, match="inconsistent header"):
            encode_header(dataclasses.replace(h, segments=()))

    def test_decode_no_segments_inconsistent(self):
        # build the bit string by hand: valid crc, zero segments, nonzero length
        h = random_header(np.random.default_rng(6))
        good = encode_header(h).tolist()
        n_seg = len(h.segments)
        start = 16 + 8 + 1 + 32 + 16
        body = good[:start] + [0] * 16 + good[start + 16 + 40 * n_seg:-16]
        bits = body + [(crc16(body) >> (15 - i)) & 1 for i in range(16)]
        with pytest.raises(HeaderError, match="inconsistent header"):
            decode_header(bits)

    def test_unordered_segments(self):
        h = random_header(np.random.default_rng(7))
        s = Segment(0, 0, 1, 10)
        with pytest.raises(HeaderError):
            encode_header(dataclasses.replace(h, segments=(s, s), total_bitstream_len=20, reserved_len=20))

    def test_field_overflow(self):
        h = random_header(np.random.default_rng(8))
        with pytest.raises(HeaderError):
            encode_header(dataclasses.replace(h, tau1=300))

    def test_too_long_for_reserved(self):
        h = random_header(np.random.default_rng(9))
        with pytest.raises(HeaderError):
            encode_header(dataclasses.replace(h, reserved_len=10))

    def test_truncated(self):
        bits = encode_header(random_header(np.random.default_rng(10)))
        with pytest.raises(HeaderError):
            decode_header(bits[:100])
