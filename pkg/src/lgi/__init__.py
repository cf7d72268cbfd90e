# lgi package
