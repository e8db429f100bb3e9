import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    // the integration suite boots the Python annotation backend
    testTimeout: 20000,
    hookTimeout: 60000,
  },
});
