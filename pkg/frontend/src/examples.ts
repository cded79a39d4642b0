// The gallery ships the workbench's standard programs.

export interface Example {
  name: string;
  title: string;
  source: string;
  tMax: number;
}

export const EXAMPLES: Example[] = [
  {
    name: "cruise",
    title: "cruise control",
    tMax: 12,
    source: `v := 5 ;
while true {
  if v <= 10 then { v' = 1 for 1 } else { v' = -1 for 1 }
}
`,
  },
  {
    name: "zeno",
    title: "halving waits",
    tMax: 2.5,
    source: `x := 1 ;
while true { wait x ; x := 0.5 * x }
`,
  },
  {
    name: "ball",
    title: "bouncing ball",
    tMax: 10,
    source: `p := 5 ; v := 0 ;
while true {
  p' = v, v' = -9.8 until [0.01] p <= 0 && v <= 0 ;
  v := -0.5 * v
}
`,
  },
  {
    name: "loop",
    title: "unit-step counter",
    tMax: 8,
    source: `x := 0 ;
while true { x := x + 1 ; wait 1 }
`,
  },
];

export function exampleByName(name: string): Example | undefined {
  return EXAMPLES.find((e) => e.name === name);
}
