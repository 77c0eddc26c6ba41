"""hcizlab - numerical lab for spherical integrals"""
