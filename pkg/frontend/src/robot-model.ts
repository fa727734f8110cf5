/** The bundled refuse-collecting robot model, uploaded on demand. */

import type { ModelDoc } from "./api.js";

export const ROBOT_MODEL: ModelDoc = {
  actions: ["Charge/Scan", "Query Assist", "Meander/Scan", "Gather"],
  hypotheses: ["Hallway", "Closet", "Office", "Stairwell", "Restroom", "Class"],
  attributes: [
    { id: "quiet", weight: 0.1 },
    { id: "efficiency", weight: 0.9 },
  ],
  outcomes: {
    "Charge/Scan|Hallway": [0.6, 0.2],
    "Charge/Scan|Closet": [1.0, 0.8],
    "Charge/Scan|Office": [0.9, 0.6],
    "Charge/Scan|Stairwell": [0.7, 0.1],
    "Charge/Scan|Restroom": [0.9, 0.1],
    "Charge/Scan|Class": [0.8, 0.5],
    "Query Assist|Hallway": [0.8, 0.8],
    "Query Assist|Closet": [0.9, 0.1],
    "Query Assist|Office": [0.4, 0.8],
    "Query Assist|Stairwell": [0.8, 0.4],
    "Query Assist|Restroom": [0.2, 0.7],
    "Query Assist|Class": [0.1, 0.8],
    "Meander/Scan|Hallway": [0.6, 0.5],
    "Meander/Scan|Closet": [0.9, 0.3],
    "Meander/Scan|Office": [0.7, 0.7],
    "Meander/Scan|Stairwell": [0.3, 0.1],
    "Meander/Scan|Restroom": [0.7, 0.7],
    "Meander/Scan|Class": [0.4, 0.6],
    "Gather|Hallway": [0.5, 0.7],
    "Gather|Closet": [1.0, 0.8],
    "Gather|Office": [0.4, 0.6],
    "Gather|Stairwell": [0.3, 0.2],
    "Gather|Restroom": [0.3, 0.3],
    "Gather|Class": [0.4, 0.5],
  },
};
