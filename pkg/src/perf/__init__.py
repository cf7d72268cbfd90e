# perf package
