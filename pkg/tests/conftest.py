from __future__ import annotations

import random

import pytest

from ariproto import AriHeader, AriPacket, Tlv, load_registry

from regbuild import doc_bytes, registry_doc


def make_random_header(rnd: random.Random, length: int | None = None) -> AriHeader:
    return AriHeader(
        group=rnd.randrange(64),
        sequence=rnd.randrange(2048),
        length=rnd.randrange(32768) if length is None else length,
        message_type=rnd.randrange(1024),
        reserved_a=rnd.randrange(8),
        reserved_b=rnd.randrange(8),
        trailer=rnd.randrange(0x10000),
    )


def make_random_packet(
    rnd: random.Random,
    max_tlvs: int = 8,
    max_value: int = 64,
    residue_chance: float = 0.0,
) -> AriPacket:
    tlvs = []
    for _ in range(rnd.randrange(max_tlvs + 1)):
        value = bytes(rnd.randrange(256) for _ in range(rnd.randrange(max_value + 1)))
        tlvs.append(
            Tlv(
                type_id=rnd.randrange(4096),
                version=rnd.randrange(8),
                value=value,
                reserved1=rnd.randrange(2),
                reserved2=rnd.randrange(4),
            )
        )
    residue = b""
    if rnd.random() < residue_chance:
        # shorter than a TLV header so it re-parses as residue
        residue = bytes(rnd.randrange(256) for _ in range(rnd.randrange(1, 4)))
    payload = sum(4 + len(t.value) for t in tlvs) + len(residue)
    header = make_random_header(rnd, length=payload)
    return AriPacket(header=header, tlvs=tuple(tlvs), residue=residue)


@pytest.fixture(scope="session")
def registry63():
    return load_registry(doc_bytes(registry_doc(num_groups=63)))


@pytest.fixture(scope="session")
def small_registry():
    return load_registry(doc_bytes(registry_doc(num_groups=12)))
