# hamiltonian package
