import sys
import xml.etree.ElementTree as ET

root = ET.parse(sys.argv[1]).getroot()
ns = "{http://www.w3.org/2000/svg}"
if root.tag != ns + "svg":
    sys.exit("root element is " + root.tag)
if not root.findall(".//" + ns + "circle"):
    sys.exit("no data points")
print("ok", sys.argv[1])
