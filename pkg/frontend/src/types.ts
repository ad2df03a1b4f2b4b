export const CLONE_LABELS = ["Type1", "Type2", "Type3", "Type4", "NotClone"] as const;
export type CloneLabel = (typeof CLONE_LABELS)[number];

export interface MethodSide {
  id: string;
  name: string;
  file: string;
  start_line: number;
  end_line: number;
  body: string;
}

export interface CloneTypeDefinition {
  label: string;
  title: string;
  text: string;
}

export interface PairPayload {
  pair_id: string;
  filter_score: number;
  a: MethodSide;
  b: MethodSide;
  definitions: CloneTypeDefinition[];
}

export interface Progress {
  total: number;
  labeled: number;
  consensus: number;
  remaining: number;
}

export interface Ack {
  ok: boolean;
  progress: Progress;
}
