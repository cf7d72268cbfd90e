# pps package
