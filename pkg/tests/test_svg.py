import xml.etree.ElementTree as ET

from exactwkb import svg

NS = "{http://www.w3.org/2000/svg}"


def test_stokes_svg_content(harmonic):
    text = svg.stokes_svg(harmonic.to_json())
    root = ET.fromstring(text.split("\n", 1)[1])
    assert root.get("version") == "1.1"
    assert len(root.findall(f".//{NS}polyline")) == len(harmonic.lines)
    labels = [t.text for t in root.iter(f"{NS}text")]
    assert labels == ["S1 (-)", "S2 (+)", "S3 (-)", "S4 (+)"]
    assert len([c for c in root.iter(f"{NS}circle") if c.get("id", "").startswith("tp")]) == 2


def test_svg_deterministic(airy):
    assert svg.stokes_svg(airy.to_json()) == svg.stokes_svg(airy.to_json())


def test_pole_map_marks_froissart():
    data = {
        "pade": {"poles": [{"pole": [0.7, 0.0], "residue": [1, 0], "froissart": False},
                           {"pole": [-1.0, 1.0], "residue": [0, 0], "froissart": True}]},
        "forecast": {"moving": [0.6667, 0.0], "fixed": [[0.0, 1.57]]},
        "radius_estimate": 0.67,
        "rays": [3.14159],
    }
    root = ET.fromstring(svg.pole_map_svg(data).split("\n", 1)[1])
    assert len(root.findall(f".//{NS}path")) == 1  # the Froissart cross
    assert len(root.findall(f".//{NS}rect")) == 3  # background, clip, fixed point
