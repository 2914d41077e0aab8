"""Reference LZW over the binary alphabet, used only as a test oracle.

Written independently of the package implementation (slice-probing parser
here vs. the package's streaming prefix walk) so the two can cross-check
each other. Rules:

  * dictionary starts as {"0": 0, "1": 1};
  * greedy longest-match parsing;
  * each emitted code is charged ceil(log2(dictionary size)) bits, with the
    size taken at emission time, before the post-emission growth;
  * after each emission the dictionary gains matched-string + next-bit
    (no growth after the final match, which has no next bit);
  * the dictionary is unbounded and never reset.

Because every emission except the last adds exactly one entry, the width of
the t-th code (1-based) is ceil(log2(t + 1)); the decoder exploits that to
read a packed stream without side information.
"""


def ref_encode(bits: str) -> tuple[list[int], list[int]]:
    """Return (codes, widths) for a '0'/'1' string."""
    if not bits or set(bits) - {"0", "1"}:
        raise ValueError("input must be a nonempty string over {'0','1'}")
    table = {"0": 0, "1": 1}
    codes: list[int] = []
    widths: list[int] = []
    i = 0
    n = len(bits)
    while i < n:
        j = i + 1
        while j <= n and bits[i:j] in table:
            j += 1
        # bits[i:j-1] is the longest dictionary match starting at i
        codes.append(table[bits[i : j - 1]])
        widths.append((len(table) - 1).bit_length())
        if j <= n:
            table[bits[i:j]] = len(table)
        i = j - 1
    return codes, widths


def ref_pack(codes: list[int], widths: list[int]) -> str:
    """Concatenate codes at their charged widths into a '0'/'1' string."""
    return "".join(format(c, f"0{w}b") for c, w in zip(codes, widths))


def ref_decode_codes(codes: list[int]) -> str:
    """Rebuild the input from the raw code sequence."""
    table = ["0", "1"]
    out: list[str] = []
    prev: str | None = None
    for code in codes:
        if code < len(table):
            cur = table[code]
            if prev is not None:
                table.append(prev + cur[0])
        elif code == len(table) and prev is not None:
            # code refers to the entry being built: prev + prev[0]
            cur = prev + prev[0]
            table.append(cur)
        else:
            raise ValueError(f"invalid code {code}")
        out.append(cur)
        prev = cur
    return "".join(out)


def ref_decode_packed(packed: str) -> str:
    """Rebuild the input from the packed bit string alone."""
    codes: list[int] = []
    pos = 0
    t = 1
    while pos < len(packed):
        width = t.bit_length()  # == ceil(log2(t + 1))
        if pos + width > len(packed):
            raise ValueError("truncated packed stream")
        codes.append(int(packed[pos : pos + width], 2))
        pos += width
        t += 1
    return ref_decode_codes(codes)
