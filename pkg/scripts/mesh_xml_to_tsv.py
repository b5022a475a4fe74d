"""Flatten an NLM MeSH descriptor XML release (descYYYY.xml) into the
taxonomy TSV read by ``topicnet``.

    python scripts/mesh_xml_to_tsv.py desc1999.xml mesh_1999.tsv
"""

import argparse
import xml.etree.ElementTree as ET


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("xml")
    ap.add_argument("tsv")
    args = ap.parse_args()
    rows = 0
    with open(args.tsv, "w", encoding="utf-8") as out:
        out.write("descriptor_ui\tdescriptor_name\ttree_numbers\n")
        for _, elem in ET.iterparse(args.xml):
            if elem.tag != "DescriptorRecord":
                continue
            ui = elem.findtext("DescriptorUI")
            name = elem.findtext("DescriptorName/String")
            trees = [t.text.strip() for t in elem.findall("TreeNumberList/TreeNumber") if t.text]
            if ui and name and trees:
                out.write(f"{ui}\t{name}\t{';'.join(trees)}\n")
                rows += 1
            elem.clear()
    print(f"wrote {rows} descriptors to {args.tsv}")


if __name__ == "__main__":
    main()
