"""Frozen oracle values; regenerate with tests/regen_golden.py."""
SIGMA, TAU = (0.07+0.34j), (-0.04+0.37j)
SPIN_A = ((0.3, -0.3), (1, 1))
SPIN_B = ((0.15, -0.15), (0, 0))
STAR_CORNERS = (((0.12, -0.12), (0, 0)), ((0.41, -0.41), (1, 1)), ((0.77, -0.77), (1, 1)), ((0.05, -0.05), (0, 0)))
STAR_RAPIDITIES = (0.15, 0.17, 0.0, 0.02)
GOLDEN = {'irf1_n2_r2': (1.1568196175761334+0.09109045452182347j),
 'irf2_n2_r2': (1.1527864014001534+0.08978144133600047j),
 'lambda': [(1, (0.7948312523134076-0.02914287386272801j)),
            (2, (0.9828412115713844-0.006200216732263175j)),
            (3, (0.998912037320377-0.0009543294823017171j))],
 'lens_gamma': [((0.2+0.1j), 0, 1, (0.7896302334268606+0.6576661198770632j)),
                ((0.31+0.07j), 0, 2, (0.6384379238800586+0.335798497609653j)),
                ((0.31+0.07j), 1, 2, (0.5623294803792559-0.20326413257471176j)),
                ((-0.45+0.2j), 2, 3, (0.1999267517535101+0.6688564705821803j)),
                ((0.05+0.3j), 1, 3, (0.8455250158831692-0.32753153502023685j))],
 'lens_theta': [(1, (0.3+0.1j), 1, 2, (1.4316150831456962+0.8508351259609348j)),
                (2, (0.3+0.1j), 1, 2, (1.2552731413029536+0.910519445220747j)),
                (1, (-0.2+0.05j), 0, 1, (0.7484239295325885+0.6044257917904465j)),
                (2, (-0.2+0.05j), 0, 1, (0.8209454879649102+0.596627060355948j)),
                (1, (0.7-0.1j), 2, 3, (1.8598876342343988-1.3643470905781607j)),
                (2, (0.7-0.1j), 2, 3, (1.218361776423386+2.4081362633833208j))],
 'phi_0.2_1_r2': (0.9723257171401952+0.2721141687770665j),
 'self_n2_r2': (3.7204325687218236+0.03750195824283517j),
 'w_n2_r2': (0.8014756354452612-0.6050406900650269j),
 'wbar_n2_r2': (0.20784289618455495+0.21245404424124276j)}
