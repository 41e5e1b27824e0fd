"""Wireshark dissector-script generation (Lua) from a definition registry.

The emitted script is a pure function of the registry: identical registries
produce byte-identical text. Registry names appear exactly once, inside the
delimited name-table / codec-table sections; everything else is fixed
boilerplate. Field extraction mirrors the bit layout of the core codec.
"""

from __future__ import annotations

from .defs import DefinitionRegistry

#: pcap link type the exporter writes; the script binds to it (DLT 147 = USER0).
USER_DLT = 147

NAME_TABLES_BEGIN = "-- >>> name tables"
NAME_TABLES_END = "-- <<< name tables"
CODEC_TABLES_BEGIN = "-- >>> codec tables"
CODEC_TABLES_END = "-- <<< codec tables"

_PREAMBLE = f"""\
-- ARI baseband management protocol dissector.
-- Generated from a protocol definition file; do not edit by hand.
-- Reads frames captured with pcap link type {USER_DLT} (first user-defined DLT).

local ari = Proto("ari", "ARI baseband management protocol")

local f_group     = ProtoField.uint8("ari.group", "Group", base.DEC)
local f_gname     = ProtoField.string("ari.group_name", "Group Name")
local f_sequence  = ProtoField.uint16("ari.sequence", "Sequence Number", base.DEC)
local f_length    = ProtoField.uint16("ari.length", "Payload Length", base.DEC)
local f_mtype     = ProtoField.uint16("ari.message_type", "Message Type", base.HEX)
local f_mname     = ProtoField.string("ari.message_name", "Message Name")
local f_trailer   = ProtoField.uint16("ari.trailer", "Trailer", base.HEX)
local f_tlv       = ProtoField.bytes("ari.tlv", "TLV")
local f_tlv_type  = ProtoField.uint16("ari.tlv.type", "TLV Type", base.HEX)
local f_tlv_ver   = ProtoField.uint8("ari.tlv.version", "TLV Version", base.DEC)
local f_tlv_len   = ProtoField.uint16("ari.tlv.length", "TLV Length", base.DEC)
local f_tlv_name  = ProtoField.string("ari.tlv.name", "TLV Name")
local f_tlv_value = ProtoField.bytes("ari.tlv.value", "TLV Value")
local f_tlv_text  = ProtoField.string("ari.tlv.decoded", "TLV Decoded")
local f_residue   = ProtoField.bytes("ari.residue", "Residue")

ari.fields = {{
  f_group, f_gname, f_sequence, f_length, f_mtype, f_mname, f_trailer,
  f_tlv, f_tlv_type, f_tlv_ver, f_tlv_len, f_tlv_name, f_tlv_value,
  f_tlv_text, f_residue,
}}

-- take `width` bits of x starting `shift` bits up from the LSB
local function bits(x, shift, width)
  return math.floor(x / 2 ^ shift) % 2 ^ width
end
"""

_DISSECTOR_BODY = """\
local function decode_codec(codec_name, value_range)
  local n = value_range:len()
  if n == 0 or n > 8 then
    return nil
  end
  local v = value_range:le_uint64():tonumber()
  if n <= 4 then
    v = value_range:le_uint()
  end
  if codec_name == "unsigned-int" then
    return tostring(v)
  end
  local table_ = codec_tables[codec_name]
  if table_ == nil then
    return nil
  end
  local i = v - table_.offset
  if i >= 0 and i < #table_.entries then
    return table_.entries[i + 1]
  end
  return "???"
end

function ari.dissector(buffer, pinfo, tree)
  if buffer:len() < 12 then
    return 0
  end
  if buffer(0, 4):uint() ~= 0xdec07eab then
    return 0
  end
  pinfo.cols.protocol = "ARI"

  local b4 = buffer(4, 1):uint()
  local b5 = buffer(5, 1):uint()
  local b6 = buffer(6, 1):uint()
  local b7 = buffer(7, 1):uint()
  local b8 = buffer(8, 1):uint()
  local b9 = buffer(9, 1):uint()

  local group = bits(b5, 0, 1) * 32 + bits(b4, 3, 5)
  local sequence = bits(b8, 0, 3) * 256 + bits(b6, 0, 1) * 128 + bits(b5, 1, 7)
  local length = b7 * 128 + bits(b6, 1, 7)
  local mtype = bits(b8, 6, 2) * 256 + b9

  local top = tree:add(ari, buffer(0, 12 + length))
  top:add(f_group, buffer(4, 2), group)
  local gname = group_names[group]
  if gname ~= nil then
    top:add(f_gname, buffer(4, 2), gname)
  end
  top:add(f_sequence, buffer(5, 4), sequence)
  top:add(f_length, buffer(6, 2), length)
  top:add(f_mtype, buffer(8, 2), mtype)
  local mname = message_names[group] and message_names[group][mtype]
  if mname ~= nil then
    top:add(f_mname, buffer(8, 2), mname)
  end
  top:add(f_trailer, buffer(10, 2))
  pinfo.cols.info = string.format(
    "%s / %s", gname or string.format("group %d", group),
    mname or string.format("type 0x%x", mtype))

  local names = tlv_names[group] and tlv_names[group][mtype]
  local codecs = tlv_codecs[group] and tlv_codecs[group][mtype]
  local off = 12
  local packet_end = math.min(buffer:len(), 12 + length)
  while off + 4 <= packet_end do
    local t0 = buffer(off, 1):uint()
    local t1 = buffer(off + 1, 1):uint()
    local t2 = buffer(off + 2, 1):uint()
    local t3 = buffer(off + 3, 1):uint()
    local tlv_type = bits(t1, 0, 5) * 128 + bits(t0, 1, 7)
    local tlv_ver = bits(t1, 5, 3)
    local tlv_len = t3 * 64 + bits(t2, 2, 6)
    if off + 4 + tlv_len > packet_end then
      break
    end
    local item = tree:add(f_tlv, buffer(off, 4 + tlv_len))
    item:add(f_tlv_type, buffer(off, 2), tlv_type)
    item:add(f_tlv_ver, buffer(off + 1, 1), tlv_ver)
    item:add(f_tlv_len, buffer(off + 2, 2), tlv_len)
    local tname = names and names[tlv_type]
    if tname ~= nil then
      item:add(f_tlv_name, buffer(off, 2), tname)
      item:set_text(string.format("TLV: %s", tname))
    end
    if tlv_len > 0 then
      local value_range = buffer(off + 4, tlv_len)
      item:add(f_tlv_value, value_range)
      local codec_name = codecs and codecs[tlv_type]
      if codec_name ~= nil then
        local decoded = decode_codec(codec_name, value_range)
        if decoded ~= nil then
          item:add(f_tlv_text, value_range, decoded)
        end
      end
    end
    off = off + 4 + tlv_len
  end
  if off < packet_end then
    tree:add(f_residue, buffer(off, packet_end - off))
  end
  return packet_end
end

local wtap_table = DissectorTable.get("wtap_encap")
-- DLT 147 maps to the USER0 wtap encapsulation (45)
local user0 = 45
if wtap ~= nil and wtap.USER0 ~= nil then
  user0 = wtap.USER0
end
wtap_table:add(user0, ari)
"""


def _lua_quote(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return f'"{escaped}"'


def emit_wireshark_dissector(reg: DefinitionRegistry) -> str:
    """Render the registry as a loadable Wireshark Lua script."""
    out: list[str] = [_PREAMBLE]

    out.append(NAME_TABLES_BEGIN)
    out.append("local group_names = {")
    for g in reg.groups:
        out.append(f"  [{g.group_id}] = {_lua_quote(g.name)},")
    out.append("}")

    out.append("local message_names = {")
    for g in reg.groups:
        if not g.messages:
            continue
        out.append(f"  [{g.group_id}] = {{")
        for m in g.messages:
            out.append(f"    [0x{m.type_id:x}] = {_lua_quote(m.name)},")
        out.append("  },")
    out.append("}")

    out.append("local tlv_names = {")
    for g in reg.groups:
        if not any(m.tlvs for m in g.messages):
            continue
        out.append(f"  [{g.group_id}] = {{")
        for m in g.messages:
            if not m.tlvs:
                continue
            out.append(f"    [0x{m.type_id:x}] = {{")
            for t in m.tlvs:
                out.append(f"      [0x{t.type_id:x}] = {_lua_quote(t.name)},")
            out.append("    },")
        out.append("  },")
    out.append("}")
    out.append(NAME_TABLES_END)

    out.append(CODEC_TABLES_BEGIN)
    out.append("local codec_tables = {")
    for c in reg.codecs:
        entries = ", ".join(_lua_quote(e) for e in c.entries)
        out.append(
            f"  [{_lua_quote(c.name)}] = {{ offset = {c.offset}, entries = {{ {entries} }} }},"
        )
    out.append("}")

    out.append("local tlv_codecs = {")
    for g in reg.groups:
        if not any(m.tlvs for m in g.messages):
            continue
        out.append(f"  [{g.group_id}] = {{")
        for m in g.messages:
            if not m.tlvs:
                continue
            out.append(f"    [0x{m.type_id:x}] = {{")
            for t in m.tlvs:
                out.append(f"      [0x{t.type_id:x}] = {_lua_quote(t.codec)},")
            out.append("    },")
        out.append("  },")
    out.append("}")
    out.append(CODEC_TABLES_END)

    out.append("")
    out.append(_DISSECTOR_BODY)
    return "\n".join(out)
