# Privacy-act scenario: personal information is collected (A) while
# medical information is collected (D), the personal information is later
# destroyed (B), and no court order (C) ever holds. The tail of the run is
# folded into the self-looping sink tl.
props A B C D
state t0:
state t1: A D
state t2: B
state tl:
trans t0 -> t1
trans t1 -> t2
trans t2 -> tl
trans tl -> tl
