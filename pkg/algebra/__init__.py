"""
Exact algebra for properads and homotopy transfer.

Modules:
    exactlinalg  graded spaces, maps and cohomology retracts over Q
    bimodule     Sigma-bimodules, decorated graphs and free elements
    properad     compositions, cocomposition, coderivations, bar and sh structures
    transfer     the transfer engine and the induced morphism
    merkulov     the classical A-infinity recursion used as an oracle
    reports      check records and suite reports
"""
