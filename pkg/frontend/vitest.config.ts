import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    include: ["tests/**/*.test.ts"],
    // the e2e file seeds a 20-asset store through the real pipeline
    testTimeout: 180_000,
    hookTimeout: 180_000,
  },
});
