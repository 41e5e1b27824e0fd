"""Synthetic definition-registry builders shared across the test suite.

All names are unique and deterministic so emission and diff tests can make
exact-count assertions. Group 9 is always "net_cell" and carries the
(9, 0x101) message with the nInstance_t1 TLV used by the dissection tests.
"""

from __future__ import annotations

import json

NET_CELL_GROUP = 9
NET_CELL_MESSAGE_TYPE = 0x101
NET_CELL_MESSAGE_NAME = "IBINetSetRadioSignalReportingConfiguration"
NET_CELL_TLV_TYPE = 0x101
NET_CELL_TLV_NAME = "nInstance_t1"

ENUM_CODEC_NAME = "ARI_TEST_REASON_CODEC"
SMALL_CODEC_NAME = "ARI_TEST_TOGGLE_CODEC"


def default_codecs() -> list[dict]:
    return [
        {
            "name": ENUM_CODEC_NAME,
            "offset": 1,
            "entries": [f"REASON_{i}" for i in range(1, 9)],
        },
        {"name": SMALL_CODEC_NAME, "offset": 0, "entries": ["TOGGLE_OFF", "TOGGLE_ON"]},
    ]


def registry_doc(
    num_groups: int = 4,
    messages_per_group: int = 2,
    tlvs_per_message: int = 2,
    version_label: str = "test",
    codecs: list[dict] | None = None,
) -> dict:
    """num_groups groups with ids 0..num_groups-1 and uniform contents."""
    codecs = default_codecs() if codecs is None else codecs
    codec_cycle = ["unsigned-int", "byte-blob", "text", ENUM_CODEC_NAME]
    groups = []
    for gid in range(num_groups):
        messages = []
        for m in range(messages_per_group):
            mtype = 0x100 + m
            tlvs = []
            for i in range(1, tlvs_per_message + 1):
                tlvs.append(
                    {
                        "index": i,
                        "type": 0x100 + i,
                        "codec": codec_cycle[(gid + m + i) % len(codec_cycle)],
                        "name": f"fld_g{gid}m{m}i{i}",
                        "mandatory": i == 1,
                    }
                )
            messages.append({"type": mtype, "name": f"Msg_g{gid}_t{mtype:x}", "tlvs": tlvs})
        groups.append({"id": gid, "name": group_name(gid), "messages": messages})

    _plant_net_cell(groups)
    return {"version_label": version_label, "groups": groups, "codecs": codecs}


def group_name(gid: int) -> str:
    return "net_cell" if gid == NET_CELL_GROUP else f"grp_{gid:02d}"


def _plant_net_cell(groups: list[dict]) -> None:
    """Give group 9 the well-known message/TLV the dissection tests expect."""
    for group in groups:
        if group["id"] != NET_CELL_GROUP:
            continue
        group["name"] = "net_cell"
        for message in group["messages"]:
            if message["type"] == NET_CELL_MESSAGE_TYPE:
                break
        else:
            message = {"type": NET_CELL_MESSAGE_TYPE, "name": "", "tlvs": []}
            group["messages"].append(message)
        message["name"] = NET_CELL_MESSAGE_NAME
        message["tlvs"] = [
            {
                "index": 1,
                "type": NET_CELL_TLV_TYPE,
                "codec": "unsigned-int",
                "name": NET_CELL_TLV_NAME,
                "mandatory": True,
            }
        ] + [
            {**t, "index": t["index"] + 1, "type": t["type"] + 0x100}
            for t in message["tlvs"]
            if t["type"] != NET_CELL_TLV_TYPE
        ]


def sized_registry_doc(tlv_total: int, num_groups: int = 63,
                       version_label: str = "sized") -> dict:
    """Exactly tlv_total TLV definitions spread round-robin over the groups."""
    groups = []
    for gid in range(num_groups):
        groups.append(
            {
                "id": gid,
                "name": group_name(gid),
                "messages": [{"type": 0x100, "name": f"Msg_g{gid}_t100", "tlvs": []}],
            }
        )
    for i in range(tlv_total):
        message = groups[i % num_groups]["messages"][0]
        index = len(message["tlvs"]) + 1
        message["tlvs"].append(
            {
                "index": index,
                "type": 0x100 + index,
                "codec": "byte-blob",
                "name": f"fld_g{i % num_groups}_n{index}",
                "mandatory": False,
            }
        )
    return {"version_label": version_label, "groups": groups, "codecs": default_codecs()}


def doc_bytes(doc: dict) -> bytes:
    return json.dumps(doc).encode("utf-8")
