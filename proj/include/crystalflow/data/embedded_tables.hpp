// Embedded copies of the table files shipped under data/.
// The library parses these at startup so binaries are self-contained;
// the data/ files are the canonical versioned source and a test asserts
// byte equality between the two.
#pragma once

#include <string_view>

namespace crystalflow::data {

inline constexpr std::string_view kSpaceGroupsTsv = R"cfdata(# space group classification table
# columns: number, hermann_mauguin, crystal_lattice_system, point_symmetry, lattice_system, wyckoff_multiplicities (comma-separated, ascending)
number	hermann_mauguin	crystal_lattice_system	point_symmetry	lattice_system	wyckoff_multiplicities
1	P1	triclinic	enantiomorphic-polar	triclinic	1
2	P-1	triclinic	centrosymmetric	triclinic	1,2
3	P2	monoclinic	enantiomorphic-polar	monoclinic	1,2
4	P2_1	monoclinic	enantiomorphic-polar	monoclinic	2
5	C2	monoclinic	enantiomorphic-polar	monoclinic	2,4
6	Pm	monoclinic	polar	monoclinic	1,2
7	Pc	monoclinic	polar	monoclinic	2
8	Cm	monoclinic	polar	monoclinic	2,4
9	Cc	monoclinic	polar	monoclinic	4
10	P2/m	monoclinic	centrosymmetric	monoclinic	1,2,4
11	P2_1/m	monoclinic	centrosymmetric	monoclinic	2,4
12	C2/m	monoclinic	centrosymmetric	monoclinic	2,4,8
13	P2/c	monoclinic	centrosymmetric	monoclinic	2,4
14	P2_1/c	monoclinic	centrosymmetric	monoclinic	2,4
15	C2/c	monoclinic	centrosymmetric	monoclinic	4,8
16	P222	orthorhombic	enantiomorphic	orthorhombic	1,2,4
17	P222_1	orthorhombic	enantiomorphic	orthorhombic	2,4
18	P2_12_12	orthorhombic	enantiomorphic	orthorhombic	2,4
19	P2_12_12_1	orthorhombic	enantiomorphic	orthorhombic	4
20	C222_1	orthorhombic	enantiomorphic	orthorhombic	4,8
21	C222	orthorhombic	enantiomorphic	orthorhombic	2,4,8
22	F222	orthorhombic	enantiomorphic	orthorhombic	4,8,16
23	I222	orthorhombic	enantiomorphic	orthorhombic	2,4,8
24	I2_12_12_1	orthorhombic	enantiomorphic	orthorhombic	4,8
25	Pmm2	orthorhombic	polar	orthorhombic	1,2,4
26	Pmc2_1	orthorhombic	polar	orthorhombic	2,4
27	Pcc2	orthorhombic	polar	orthorhombic	2,4
28	Pma2	orthorhombic	polar	orthorhombic	2,4
29	Pca2_1	orthorhombic	polar	orthorhombic	4
30	Pnc2	orthorhombic	polar	orthorhombic	2,4
31	Pmn2_1	orthorhombic	polar	orthorhombic	2,4
32	Pba2	orthorhombic	polar	orthorhombic	2,4
33	Pna2_1	orthorhombic	polar	orthorhombic	4
34	Pnn2	orthorhombic	polar	orthorhombic	2,4
35	Cmm2	orthorhombic	polar	orthorhombic	2,4,8
36	Cmc2_1	orthorhombic	polar	orthorhombic	4,8
37	Ccc2	orthorhombic	polar	orthorhombic	4,8
38	Amm2	orthorhombic	polar	orthorhombic	2,4,8
39	Aem2	orthorhombic	polar	orthorhombic	4,8
40	Ama2	orthorhombic	polar	orthorhombic	4,8
41	Aea2	orthorhombic	polar	orthorhombic	4,8
42	Fmm2	orthorhombic	polar	orthorhombic	4,8,16
43	Fdd2	orthorhombic	polar	orthorhombic	8,16
44	Imm2	orthorhombic	polar	orthorhombic	2,4,8
45	Iba2	orthorhombic	polar	orthorhombic	4,8
46	Ima2	orthorhombic	polar	orthorhombic	4,8
47	Pmmm	orthorhombic	centrosymmetric	orthorhombic	1,2,4,8
48	Pnnn	orthorhombic	centrosymmetric	orthorhombic	2,4,8
49	Pccm	orthorhombic	centrosymmetric	orthorhombic	2,4,8
50	Pban	orthorhombic	centrosymmetric	orthorhombic	2,4,8
51	Pmma	orthorhombic	centrosymmetric	orthorhombic	2,4,8
52	Pnna	orthorhombic	centrosymmetric	orthorhombic	4,8
53	Pmna	orthorhombic	centrosymmetric	orthorhombic	2,4,8
54	Pcca	orthorhombic	centrosymmetric	orthorhombic	4,8
55	Pbam	orthorhombic	centrosymmetric	orthorhombic	2,4,8
56	Pccn	orthorhombic	centrosymmetric	orthorhombic	4,8
57	Pbcm	orthorhombic	centrosymmetric	orthorhombic	4,8
58	Pnnm	orthorhombic	centrosymmetric	orthorhombic	2,4,8
59	Pmmn	orthorhombic	centrosymmetric	orthorhombic	2,4,8
60	Pbcn	orthorhombic	centrosymmetric	orthorhombic	4,8
61	Pbca	orthorhombic	centrosymmetric	orthorhombic	4,8
62	Pnma	orthorhombic	centrosymmetric	orthorhombic	4,8
63	Cmcm	orthorhombic	centrosymmetric	orthorhombic	4,8,16
64	Cmce	orthorhombic	centrosymmetric	orthorhombic	4,8,16
65	Cmmm	orthorhombic	centrosymmetric	orthorhombic	2,4,8,16
66	Cccm	orthorhombic	centrosymmetric	orthorhombic	4,8,16
67	Cmme	orthorhombic	centrosymmetric	orthorhombic	4,8,16
68	Ccce	orthorhombic	centrosymmetric	orthorhombic	4,8,16
69	Fmmm	orthorhombic	centrosymmetric	orthorhombic	4,8,16,32
70	Fddd	orthorhombic	centrosymmetric	orthorhombic	8,16,32
71	Immm	orthorhombic	centrosymmetric	orthorhombic	2,4,8,16
72	Ibam	orthorhombic	centrosymmetric	orthorhombic	4,8,16
73	Ibca	orthorhombic	centrosymmetric	orthorhombic	8,16
74	Imma	orthorhombic	centrosymmetric	orthorhombic	4,8,16
75	P4	tetragonal	enantiomorphic-polar	tetragonal	1,2,4
76	P4_1	tetragonal	enantiomorphic-polar	tetragonal	4
77	P4_2	tetragonal	enantiomorphic-polar	tetragonal	2,4
78	P4_3	tetragonal	enantiomorphic-polar	tetragonal	4
79	I4	tetragonal	enantiomorphic-polar	tetragonal	2,4,8
80	I4_1	tetragonal	enantiomorphic-polar	tetragonal	4,8
81	P-4	tetragonal	non-centrosymmetric	tetragonal	1,2,4
82	I-4	tetragonal	non-centrosymmetric	tetragonal	2,4,8
83	P4/m	tetragonal	centrosymmetric	tetragonal	1,2,4,8
84	P4_2/m	tetragonal	centrosymmetric	tetragonal	2,4,8
85	P4/n	tetragonal	centrosymmetric	tetragonal	2,4,8
86	P4_2/n	tetragonal	centrosymmetric	tetragonal	2,4,8
87	I4/m	tetragonal	centrosymmetric	tetragonal	2,4,8,16
88	I4_1/a	tetragonal	centrosymmetric	tetragonal	4,8,16
89	P422	tetragonal	enantiomorphic	tetragonal	1,2,4,8
90	P42_12	tetragonal	enantiomorphic	tetragonal	2,4,8
91	P4_122	tetragonal	enantiomorphic	tetragonal	4,8
92	P4_12_12	tetragonal	enantiomorphic	tetragonal	4,8
93	P4_222	tetragonal	enantiomorphic	tetragonal	2,4,8
94	P4_22_12	tetragonal	enantiomorphic	tetragonal	2,4,8
95	P4_322	tetragonal	enantiomorphic	tetragonal	4,8
96	P4_32_12	tetragonal	enantiomorphic	tetragonal	4,8
97	I422	tetragonal	enantiomorphic	tetragonal	2,4,8,16
98	I4_122	tetragonal	enantiomorphic	tetragonal	4,8,16
99	P4mm	tetragonal	polar	tetragonal	1,2,4,8
100	P4bm	tetragonal	polar	tetragonal	2,4,8
101	P4_2cm	tetragonal	polar	tetragonal	2,4,8
102	P4_2nm	tetragonal	polar	tetragonal	2,4,8
103	P4cc	tetragonal	polar	tetragonal	2,4,8
104	P4nc	tetragonal	polar	tetragonal	2,4,8
105	P4_2mc	tetragonal	polar	tetragonal	2,4,8
106	P4_2bc	tetragonal	polar	tetragonal	4,8
107	I4mm	tetragonal	polar	tetragonal	2,4,8,16
108	I4cm	tetragonal	polar	tetragonal	4,8,16
109	I4_1md	tetragonal	polar	tetragonal	4,8,16
110	I4_1cd	tetragonal	polar	tetragonal	8,16
111	P-42m	tetragonal	non-centrosymmetric	tetragonal	1,2,4,8
112	P-42c	tetragonal	non-centrosymmetric	tetragonal	2,4,8
113	P-42_1m	tetragonal	non-centrosymmetric	tetragonal	2,4,8
114	P-42_1c	tetragonal	non-centrosymmetric	tetragonal	2,4,8
115	P-4m2	tetragonal	non-centrosymmetric	tetragonal	1,2,4,8
116	P-4c2	tetragonal	non-centrosymmetric	tetragonal	2,4,8
117	P-4b2	tetragonal	non-centrosymmetric	tetragonal	2,4,8
118	P-4n2	tetragonal	non-centrosymmetric	tetragonal	2,4,8
119	I-4m2	tetragonal	non-centrosymmetric	tetragonal	2,4,8,16
120	I-4c2	tetragonal	non-centrosymmetric	tetragonal	4,8,16
121	I-42m	tetragonal	non-centrosymmetric	tetragonal	2,4,8,16
122	I-42d	tetragonal	non-centrosymmetric	tetragonal	4,8,16
123	P4/mmm	tetragonal	centrosymmetric	tetragonal	1,2,4,8,16
124	P4/mcc	tetragonal	centrosymmetric	tetragonal	2,4,8,16
125	P4/nbm	tetragonal	centrosymmetric	tetragonal	2,4,8,16
126	P4/nnc	tetragonal	centrosymmetric	tetragonal	2,4,8,16
127	P4/mbm	tetragonal	centrosymmetric	tetragonal	2,4,8,16
128	P4/mnc	tetragonal	centrosymmetric	tetragonal	2,4,8,16
129	P4/nmm	tetragonal	centrosymmetric	tetragonal	2,4,8,16
130	P4/ncc	tetragonal	centrosymmetric	tetragonal	4,8,16
131	P4_2/mmc	tetragonal	centrosymmetric	tetragonal	2,4,8,16
132	P4_2/mcm	tetragonal	centrosymmetric	tetragonal	2,4,8,16
133	P4_2/nbc	tetragonal	centrosymmetric	tetragonal	4,8,16
134	P4_2/nnm	tetragonal	centrosymmetric	tetragonal	2,4,8,16
135	P4_2/mbc	tetragonal	centrosymmetric	tetragonal	4,8,16
136	P4_2/mnm	tetragonal	centrosymmetric	tetragonal	2,4,8,16
137	P4_2/nmc	tetragonal	centrosymmetric	tetragonal	2,4,8,16
138	P4_2/ncm	tetragonal	centrosymmetric	tetragonal	4,8,16
139	I4/mmm	tetragonal	centrosymmetric	tetragonal	2,4,8,16,32
140	I4/mcm	tetragonal	centrosymmetric	tetragonal	4,8,16,32
141	I4_1/amd	tetragonal	centrosymmetric	tetragonal	4,8,16,32
142	I4_1/acd	tetragonal	centrosymmetric	tetragonal	8,16,32
143	P3	trigonal-hexagonal	enantiomorphic-polar	hexagonal	1,3
144	P3_1	trigonal-hexagonal	enantiomorphic-polar	hexagonal	3
145	P3_2	trigonal-hexagonal	enantiomorphic-polar	hexagonal	3
146	R3	trigonal-rhombohedral	enantiomorphic-polar	rhombohedral	3,9
147	P-3	trigonal-hexagonal	centrosymmetric	hexagonal	1,2,3,6
148	R-3	trigonal-rhombohedral	centrosymmetric	rhombohedral	3,6,9,18
149	P312	trigonal-hexagonal	enantiomorphic	hexagonal	1,2,3,6
150	P321	trigonal-hexagonal	enantiomorphic	hexagonal	1,2,3,6
151	P3_112	trigonal-hexagonal	enantiomorphic	hexagonal	3,6
152	P3_121	trigonal-hexagonal	enantiomorphic	hexagonal	3,6
153	P3_212	trigonal-hexagonal	enantiomorphic	hexagonal	3,6
154	P3_221	trigonal-hexagonal	enantiomorphic	hexagonal	3,6
155	R32	trigonal-rhombohedral	enantiomorphic	rhombohedral	3,6,9,18
156	P3m1	trigonal-hexagonal	polar	hexagonal	1,3,6
157	P31m	trigonal-hexagonal	polar	hexagonal	1,2,3,6
158	P3c1	trigonal-hexagonal	polar	hexagonal	2,6
159	P31c	trigonal-hexagonal	polar	hexagonal	2,6
160	R3m	trigonal-rhombohedral	polar	rhombohedral	3,9,18
161	R3c	trigonal-rhombohedral	polar	rhombohedral	6,18
162	P-31m	trigonal-hexagonal	centrosymmetric	hexagonal	1,2,3,4,6,12
163	P-31c	trigonal-hexagonal	centrosymmetric	hexagonal	2,4,6,12
164	P-3m1	trigonal-hexagonal	centrosymmetric	hexagonal	1,2,3,6,12
165	P-3c1	trigonal-hexagonal	centrosymmetric	hexagonal	2,4,6,12
166	R-3m	trigonal-rhombohedral	centrosymmetric	rhombohedral	3,6,9,18,36
167	R-3c	trigonal-rhombohedral	centrosymmetric	rhombohedral	6,12,18,36
168	P6	hexagonal-hexagonal	enantiomorphic-polar	hexagonal	1,2,3,6
169	P6_1	hexagonal-hexagonal	enantiomorphic-polar	hexagonal	6
170	P6_5	hexagonal-hexagonal	enantiomorphic-polar	hexagonal	6
171	P6_2	hexagonal-hexagonal	enantiomorphic-polar	hexagonal	3,6
172	P6_4	hexagonal-hexagonal	enantiomorphic-polar	hexagonal	3,6
173	P6_3	hexagonal-hexagonal	enantiomorphic-polar	hexagonal	2,6
174	P-6	hexagonal-hexagonal	non-centrosymmetric	hexagonal	1,2,3,6
175	P6/m	hexagonal-hexagonal	centrosymmetric	hexagonal	1,2,3,4,6,12
176	P6_3/m	hexagonal-hexagonal	centrosymmetric	hexagonal	2,4,6,12
177	P622	hexagonal-hexagonal	enantiomorphic	hexagonal	1,2,3,4,6,12
178	P6_122	hexagonal-hexagonal	enantiomorphic	hexagonal	6,12
179	P6_522	hexagonal-hexagonal	enantiomorphic	hexagonal	6,12
180	P6_222	hexagonal-hexagonal	enantiomorphic	hexagonal	3,6,12
181	P6_422	hexagonal-hexagonal	enantiomorphic	hexagonal	3,6,12
182	P6_322	hexagonal-hexagonal	enantiomorphic	hexagonal	2,4,6,12
183	P6mm	hexagonal-hexagonal	polar	hexagonal	1,2,3,6,12
184	P6cc	hexagonal-hexagonal	polar	hexagonal	2,4,6,12
185	P6_3cm	hexagonal-hexagonal	polar	hexagonal	2,4,6,12
186	P6_3mc	hexagonal-hexagonal	polar	hexagonal	2,6,12
187	P-6m2	hexagonal-hexagonal	non-centrosymmetric	hexagonal	1,2,3,6,12
188	P-6c2	hexagonal-hexagonal	non-centrosymmetric	hexagonal	2,4,6,12
189	P-62m	hexagonal-hexagonal	non-centrosymmetric	hexagonal	1,2,3,4,6,12
190	P-62c	hexagonal-hexagonal	non-centrosymmetric	hexagonal	2,4,6,12
191	P6/mmm	hexagonal-hexagonal	centrosymmetric	hexagonal	1,2,3,4,6,12,24
192	P6/mcc	hexagonal-hexagonal	centrosymmetric	hexagonal	2,4,6,8,12,24
193	P6_3/mcm	hexagonal-hexagonal	centrosymmetric	hexagonal	2,4,6,8,12,24
194	P6_3/mmc	hexagonal-hexagonal	centrosymmetric	hexagonal	2,4,6,12,24
195	P23	cubic	enantiomorphic	cubic	1,3,4,6,12
196	F23	cubic	enantiomorphic	cubic	4,16,24,48
197	I23	cubic	enantiomorphic	cubic	2,6,8,12,24
198	P2_13	cubic	enantiomorphic	cubic	4,12
199	I2_13	cubic	enantiomorphic	cubic	8,12,24
200	Pm-3	cubic	centrosymmetric	cubic	1,3,6,8,12,24
201	Pn-3	cubic	centrosymmetric	cubic	2,4,6,8,12,24
202	Fm-3	cubic	centrosymmetric	cubic	4,8,24,32,48,96
203	Fd-3	cubic	centrosymmetric	cubic	8,16,32,48,96
204	Im-3	cubic	centrosymmetric	cubic	2,6,8,12,16,24,48
205	Pa-3	cubic	centrosymmetric	cubic	4,8,24
206	Ia-3	cubic	centrosymmetric	cubic	8,16,24,48
207	P432	cubic	enantiomorphic	cubic	1,3,6,8,12,24
208	P4_232	cubic	enantiomorphic	cubic	2,4,6,8,12,24
209	F432	cubic	enantiomorphic	cubic	4,8,24,32,48,96
210	F4_132	cubic	enantiomorphic	cubic	8,16,32,48,96
211	I432	cubic	enantiomorphic	cubic	2,6,8,12,16,24,48
212	P4_332	cubic	enantiomorphic	cubic	4,8,12,24
213	P4_132	cubic	enantiomorphic	cubic	4,8,12,24
214	I4_132	cubic	enantiomorphic	cubic	8,12,16,24,48
215	P-43m	cubic	non-centrosymmetric	cubic	1,3,4,6,12,24
216	F-43m	cubic	non-centrosymmetric	cubic	4,16,24,48,96
217	I-43m	cubic	non-centrosymmetric	cubic	2,6,8,12,24,48
218	P-43n	cubic	non-centrosymmetric	cubic	2,6,8,12,24
219	F-43c	cubic	non-centrosymmetric	cubic	8,24,32,48,96
220	I-43d	cubic	non-centrosymmetric	cubic	12,16,24,48
221	Pm-3m	cubic	centrosymmetric	cubic	1,3,6,8,12,24,48
222	Pn-3n	cubic	centrosymmetric	cubic	2,6,8,12,16,24,48
223	Pm-3n	cubic	centrosymmetric	cubic	2,6,8,12,16,24,48
224	Pn-3m	cubic	centrosymmetric	cubic	2,4,6,8,12,24,48
225	Fm-3m	cubic	centrosymmetric	cubic	4,8,24,32,48,96,192
226	Fm-3c	cubic	centrosymmetric	cubic	8,24,48,64,96,192
227	Fd-3m	cubic	centrosymmetric	cubic	8,16,32,48,96,192
228	Fd-3c	cubic	centrosymmetric	cubic	16,32,48,64,96,192
229	Im-3m	cubic	centrosymmetric	cubic	2,6,8,12,16,24,48,96
230	Ia-3d	cubic	centrosymmetric	cubic	16,24,32,48,96
)cfdata";

inline constexpr std::string_view kElementsTsv = R"cfdata(# element table: 12-element vocabulary with common oxidation states and
# the fixed 8-entry physical property vector used by the energy proxy.
# property columns (in order): atomic mass (u), covalent radius (pm),
# Pauling electronegativity, first ionization energy (eV), electron
# affinity (eV, 0 where the anion is unbound), valence electron count,
# atomic volume (cm^3/mol), static dipole polarizability (A^3).
symbol	z	period	group	oxidation_states	mass_u	covalent_radius_pm	electronegativity	first_ionization_ev	electron_affinity_ev	valence_electrons	atomic_volume_cm3_mol	polarizability_a3
H	1	1	1	-1,1	1.008	31	2.20	13.598	0.754	1	11.42	0.667
Li	3	2	1	1	6.94	128	0.98	5.392	0.618	1	13.02	24.33
C	6	2	14	-4,4	12.011	76	2.55	11.260	1.262	4	5.31	1.76
N	7	2	15	-3,3,5	14.007	71	3.04	14.534	0.000	5	13.54	1.10
O	8	2	16	-2	15.999	66	3.44	13.618	1.461	6	14.00	0.802
F	9	2	17	-1	18.998	57	3.98	17.423	3.401	7	17.10	0.557
Mg	12	3	2	2	24.305	141	1.31	7.646	0.000	2	14.00	10.60
Si	14	3	14	-4,4	28.085	111	1.90	8.152	1.390	4	12.06	5.38
P	15	3	15	-3,3,5	30.974	107	2.19	10.487	0.746	5	17.02	3.63
S	16	3	16	-2,2,4,6	32.06	105	2.58	10.360	2.077	6	15.53	2.90
Cl	17	3	17	-1,1,3,5,7	35.45	102	3.16	12.968	3.613	7	18.70	2.18
Fe	26	4	8	2,3	55.845	132	1.83	7.902	0.151	8	7.09	8.40
)cfdata";

inline constexpr std::string_view kLatticeConstraintsTsv = R"cfdata(# lattice parameter constraints per lattice system.
# tied_lengths / tied_angles: groups of parameters forced equal, written as
# concatenated parameter letters (lengths: a,b,c; angles: a=alpha, b=beta,
# g=gamma); "-" means no tie. Parameters not in any group are independent.
# alpha/beta/gamma columns: a fixed value in degrees, or "free".
lattice_system	tied_lengths	tied_angles	alpha	beta	gamma
triclinic	-	-	free	free	free
monoclinic	-	-	90	free	90
orthorhombic	-	-	90	90	90
tetragonal	ab	-	90	90	90
rhombohedral	abc	abg	free	free	free
hexagonal	ab	-	90	90	120
cubic	abc	-	90	90	90
)cfdata";

inline constexpr std::string_view kDefaultWhitelist = R"cfdata(# default space-group whitelist (113 groups).
# selection rule: round-robin over the eight crystal-lattice systems,
# within each system ascending by (minimum Wyckoff multiplicity, number).
# override with the space_group_whitelist config field.
1
2
3
4
5
6
7
8
9
10
11
12
13
14
15
16
17
18
21
23
25
26
27
28
30
31
32
34
35
38
44
47
48
49
75
77
79
81
82
83
84
85
86
87
89
90
93
94
99
111
115
123
143
144
145
146
147
148
149
150
151
152
153
154
155
156
157
158
159
160
161
162
163
164
165
166
167
168
173
174
175
176
177
182
183
184
185
186
187
188
189
190
191
192
193
195
196
197
198
200
201
204
207
208
211
215
217
218
221
222
223
224
229
)cfdata";

} // namespace crystalflow::data
