# relax package
