import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    include: ["tests/**/*.test.ts"],
    // The e2e file boots the real backend (analyze + serve subprocesses).
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
